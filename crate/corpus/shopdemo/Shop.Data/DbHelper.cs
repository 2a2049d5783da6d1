using System;
using System.Data;
using System.Data.SqlClient;

namespace Shop.Data
{
    public static class DbHelper
    {
        private const string ConnectionName = "ShopDb";

        public static int Execute(string procedure, object arg)
        {
            using (SqlConnection connection = new SqlConnection(ConnectionName))
            {
                SqlCommand command = connection.CreateCommand();
                command.CommandText = procedure;
                command.Parameters.AddWithValue("@arg", arg);
                connection.Open();
                return command.ExecuteNonQuery();
            }
        }

        public static DataTable Query(string procedure, object arg)
        {
            DataTable table = new DataTable();
            using (SqlConnection connection = new SqlConnection(ConnectionName))
            {
                SqlDataAdapter adapter = new SqlDataAdapter(procedure, connection);
                adapter.Fill(table);
            }
            return table;
        }

        public static object Scalar(string procedure, object arg)
        {
            using (SqlConnection connection = new SqlConnection(ConnectionName))
            {
                SqlCommand command = new SqlCommand(procedure, connection);
                connection.Open();
                return command.ExecuteScalar();
            }
        }
    }
}
