from instanton.main import main

main()
